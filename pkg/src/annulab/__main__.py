import sys

from annulab.cli import main

sys.exit(main())
