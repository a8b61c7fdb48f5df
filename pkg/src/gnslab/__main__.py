import sys

from gnslab.cli import main

sys.exit(main())
