"""Run the acceptance table: python3 scripts/run_suite.py [smoke|full] [criterion ...]"""
import sys

from dihedral.acceptance import run_suite

if __name__ == "__main__":
    preset = sys.argv[1] if len(sys.argv) > 1 else "smoke"
    only = [int(a) for a in sys.argv[2:]] or None
    res = run_suite(preset, only)
    sys.exit(0 if all(r.passed for r in res) else 1)
