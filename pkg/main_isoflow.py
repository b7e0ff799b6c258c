import sys

from dotenv import load_dotenv
load_dotenv()

from app.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
