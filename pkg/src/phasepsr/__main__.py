import sys

from phasepsr.cli import main

sys.exit(main())
