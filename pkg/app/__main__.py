"""Entry point: python -m app <compare|sweep|plot> ..."""
import sys

from app.bench.cli import main

if __name__ == "__main__":
    sys.exit(main())
