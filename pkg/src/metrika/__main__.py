import sys

from metrika.cli import main

sys.exit(main())
