import sys

from csfqlab.cli import main

sys.exit(main())
