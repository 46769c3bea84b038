"""Smoke test for the pssmp_py extension.

Build first:  cargo build --release -p pssmp-python --features extension-module
then run:     python3 python/smoke.py
"""

import cmath
import importlib.util
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        import pssmp_py

        return pssmp_py
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libpssmp_py.so"
        if lib.exists():
            break
    else:
        sys.exit("libpssmp_py.so not found; build the extension first")
    dest = pathlib.Path(tempfile.mkdtemp()) / "pssmp_py.so"
    shutil.copy(lib, dest)
    spec = importlib.util.spec_from_file_location("pssmp_py", dest)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main():
    m = load()

    p = m.StableParams(1.5, 0.5)
    assert abs(p.killing_rate() - p.c_minus / 1.5) < 1e-15

    rep = m.classify(1.5, 0.5, "poly:beta=1-alpha*rho,gamma=1")
    assert rep["verdict"] == "finite_absorption_continuous", rep
    assert abs(rep["kappa_star"] - 0.5) < 1e-9

    lower, upper, rho_star = m.critical_alphas("resurrected")
    assert abs(upper - 1.44386) < 1e-4 and abs(rho_star - 0.692588) < 1e-5
    _, upper, _ = m.critical_alphas("censored")
    assert abs(upper - 1.56735) < 1e-4

    k = m.Kernel(1.2, 0.5, "resurrected")
    assert abs(k.q(0.7, 2.0) - k.q(2.0, 0.7)) < 1e-12 * k.q(0.7, 2.0)
    assert abs(k.q_mass(2.0) - k.pi_hat(0.0).real * 2.0 ** -1.2) < 1e-8

    xs, chi = m.simulate_endpoints(0.7, 0.5, "dirac:a=1", n_paths=20000, seed=1)
    mean = sum(xs) / len(xs)
    se = math.sqrt(sum((x - mean) ** 2 for x in xs) / (len(xs) - 1) / len(xs))
    want = m.mean_xi1(0.7, 0.5, "dirac:a=1")
    assert abs(mean - want) < 4 * se, (mean, want, se)
    cf = sum(cmath.exp(1j * x) for x in xs) / len(xs)
    assert abs(cf - cmath.exp(-m.overline_psi(0.7, 0.5, "dirac:a=1", 1.0))) < 0.02

    try:
        m.StableParams(1.5, 0.9)
    except ValueError:
        pass
    else:
        raise AssertionError("inadmissible rho accepted")

    print("pssmp_py smoke test: ok")


if __name__ == "__main__":
    main()
