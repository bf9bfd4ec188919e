import sys

from sparse_representation_control.cli import main

sys.exit(main())
