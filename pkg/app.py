"""
FlowLab: finite-scale universal minimal flows of group extensions

Checks, on finite groups, that left translation on G is the twisted product
flow on (G/K) x K for every normal K, with the semidirect and
extension-by-compact variants, the orbit-space lemma, and towers of
iterated wreath products.

Usage:
    python app.py catalog
    python app.py verify-extension --group builtin:S3 --normal auto
    python app.py sweep --format text
"""

import sys

from flowlab.cli_runner import main


if __name__ == "__main__":
    sys.exit(main())
