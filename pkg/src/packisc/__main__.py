import sys

from packisc.cli import main

sys.exit(main())
