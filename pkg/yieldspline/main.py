"""Main entry point for yieldspline CLI."""

from .cli import main

if __name__ == "__main__":
    main()
