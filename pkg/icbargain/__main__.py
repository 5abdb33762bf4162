"""
Entry point for running icbargain as a module: python -m icbargain
"""

import sys

from icbargain.cli import main

if __name__ == "__main__":
    sys.exit(main())
