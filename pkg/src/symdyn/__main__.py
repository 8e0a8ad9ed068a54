"""Run the command line with ``python -m symdyn``."""

from symdyn.cli import main

raise SystemExit(main())
