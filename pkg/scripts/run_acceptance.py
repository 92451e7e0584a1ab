"""Run every acceptance criterion and print the reports."""
import sys

from nadyn.acceptance import run_all

if __name__ == "__main__":
    sys.exit(0 if run_all() else 1)
