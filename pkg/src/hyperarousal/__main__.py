import sys

from hyperarousal.cli import main

sys.exit(main())
