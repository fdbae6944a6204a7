import sys

from hypervolt.cli import main

sys.exit(main())
