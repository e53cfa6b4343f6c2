from spinchsh.cli import main

raise SystemExit(main())
