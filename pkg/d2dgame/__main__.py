"""Allow ``python -m d2dgame``"""

import sys

from d2dgame.harness.cli import main

sys.exit(main())
