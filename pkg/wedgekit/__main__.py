from wedgekit.main import main

raise SystemExit(main())
