import sys

from isostables.main import main

sys.exit(main())
