import sys

from fockop.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
