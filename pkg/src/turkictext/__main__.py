import sys

from turkictext.cli import main

sys.exit(main())
