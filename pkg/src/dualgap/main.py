from dotenv import load_dotenv

from dualgap.app import app

load_dotenv()


def main():
    app()


if __name__ == "__main__":
    main()
