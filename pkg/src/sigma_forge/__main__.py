import sys

from sigma_forge.cli import main

sys.exit(main())
