"""Entry point for ``python -m weylstrata``."""

from weylstrata.cli import main

raise SystemExit(main())
