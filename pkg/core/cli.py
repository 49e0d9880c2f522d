"""Console entry point: `lcpoly <args>` is `manage.py lcpoly <args>`."""
import os
import sys


def main():
    """Run the lcpoly management command with the process arguments."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    from django.core.management import execute_from_command_line

    execute_from_command_line(['lcpoly', 'lcpoly', *sys.argv[1:]])


if __name__ == '__main__':
    main()
