import sys

from freshroute.cli import main

sys.exit(main())
