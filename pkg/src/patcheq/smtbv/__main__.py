import sys

from .protocol import run_stdio

if __name__ == "__main__":
    sys.exit(run_stdio())
