"""``python -m a2im``."""

from .cli import main

raise SystemExit(main())
