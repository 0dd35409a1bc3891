import sys

from qef.cli import main

sys.exit(main())
