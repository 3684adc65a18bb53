from shelfmix.cli import main

raise SystemExit(main())
