#!/usr/bin/env python3
"""CLI integration tests: exit-code contract, output formats, round trips.

Usage: test_cli.py /path/to/hyperaz
"""

import json
import os
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
failures = []


def run(*args, env=None):
    e = os.environ.copy()
    if env:
        e.update(env)
    return subprocess.run([BIN, *args], capture_output=True, text=True,
                          env=e, timeout=300)


def check(name, cond, detail=""):
    status = "ok" if cond else "FAIL"
    print(f"[{status}] {name}" + (f": {detail}" if not cond else ""))
    if not cond:
        failures.append(name)


# --- az on x^n, boundary-vanishing: the known first-order recurrence
r = run("az", "x^n", "--var", "x:0:1", "--ansatz", "vanish")
check("az x^n vanish exit", r.returncode == 0, r.stderr)
check("az x^n vanish operator",
      "telescoper: (n + 1) - (n + 2)*N" in r.stdout, r.stdout)
check("az x^n vanish homogeneous", "homogeneous: yes" in r.stdout, r.stdout)

# --- plain ansatz exposes the boundary value I(n) = 1/(n+1)
r = run("az", "x^n", "--var", "x:0:1")
check("az x^n plain exit", r.returncode == 0, r.stderr)
check("az x^n plain rhs", "rhs: + [(n + 1)^(-1)]" in r.stdout, r.stdout)

# --- JSON schema and determinism across thread counts
r1 = run("az", "x^n", "--var", "x:0:1", "--format", "json",
         env={"HYPERAZ_THREADS": "1"})
r4 = run("az", "x^n", "--var", "x:0:1", "--format", "json",
         env={"HYPERAZ_THREADS": "4"})
check("json exit", r1.returncode == 0, r1.stderr)
check("json deterministic", r1.stdout == r4.stdout)
doc = json.loads(r1.stdout)
check("json schema", doc.get("schema") == 1)
check("json fields",
      all(k in doc for k in
          ("mode", "L", "telescoper", "certificate", "homogeneous", "rhs",
           "stats")), str(doc.keys()))
check("json telescoper shape",
      doc["telescoper"][0].keys() >= {"order", "coeff"})

# --- continuous ODE + recursion tree
r = run("caz", "exp(-x*t)", "--var", "t:0:1", "--ansatz", "vanish")
check("caz exp(-x*t) exit", r.returncode == 0, r.stderr)

r = run("caz-integrate", "exp(-x*t)", "--var", "t:0:1", "--format", "json")
check("caz-integrate exit", r.returncode == 0, r.stderr)
tree = json.loads(r.stdout)["tree"]
check("tree has children",
      len(tree["children"]) == len(tree["rhs"]) >= 1, str(tree))
check("tree leaves are closed forms",
      all("base_value" in c for c in tree["children"]), str(tree))

# --- expansion round trip with an init file
with tempfile.NamedTemporaryFile("w", suffix=".init", delete=False) as f:
    f.write("# ep^0 starts at x^0 with I(0) = 1\n")
    f.write("0 0 1\n")
    init_path = f.name
try:
    r = run("expand-direct", "exp(-x*t)", "--var", "t:0:1", "--eps", "0:0",
            "--order", "6", "--init", init_path, "--format", "json")
    check("expand-direct exit", r.returncode == 0, r.stderr)
    entry = json.loads(r.stdout)["expansion"]["entries"][0]
    # (1 - e^{-x})/x: 1, -1/2, 1/6, -1/24, ...
    check("expand-direct coeffs",
          entry["coeffs"][:4] == ["1", "-1/2", "1/6", "-1/24"],
          str(entry["coeffs"]))

    r2 = run("expand", "exp(-x*t)", "--var", "t:0:1", "--eps", "0:0",
             "--order", "6", "--init", init_path, "--format", "json")
    check("expand exit", r2.returncode == 0, r2.stderr)
    entry2 = json.loads(r2.stdout)["expansion"]["entries"][0]
    check("strategies agree", entry["coeffs"] == entry2["coeffs"])
finally:
    os.unlink(init_path)

# --- verify round trip
r = run("verify", "x^n", "--var", "x:0:1", "--mode", "discrete",
        "--ansatz", "vanish", "--tol", "1e-8")
check("verify exit", r.returncode == 0, r.stderr + r.stdout)
check("verify exact pass", "exact certificate: pass" in r.stdout, r.stdout)

# --- exit-code contract
cases = [
    (1, []),                                                # usage
    (2, ["az", "x^(n", "--var", "x:0:1"]),                  # parse error
    (2, ["az", "log(x)^n", "--var", "x:0:1"]),              # not hyperexp
    (3, ["caz", "exp(-x*t^2)", "--var", "t:0:1",
         "--lmax", "0", "--degmax", "0"]),                  # not found
    # plain certificate cannot be proven to vanish as t -> inf
    (4, ["caz", "exp(-x*t)", "--var", "t:0:inf"]),
    (5, ["expand-direct", "exp(-x*t)", "--var", "t:0:1",
         "--eps", "0:0", "--order", "4"]),                  # missing init
    (6, ["verify", "t^(-1)", "--var", "t:0:1"]),            # divergent
]
for expected, args in cases:
    r = run(*args)
    check(f"exit {expected} for {' '.join(args) or '(no args)'}",
          r.returncode == expected,
          f"got {r.returncode}: {r.stderr.strip()}")

# --- bad HYPERAZ_THREADS rejected as usage error
r = run("az", "x^n", "--var", "x:0:1", env={"HYPERAZ_THREADS": "zero"})
check("bad HYPERAZ_THREADS", r.returncode == 1, str(r.returncode))

print(f"\n{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
