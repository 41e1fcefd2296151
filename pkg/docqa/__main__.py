# SPDX-FileCopyrightText: Magenta ApS <https://magenta.dk>
# SPDX-License-Identifier: MPL-2.0
from docqa.cli import cli

if __name__ == "__main__":  # pragma: no cover
    cli()
