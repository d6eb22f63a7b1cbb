import sys

from freemaps.cli import main

sys.exit(main())
