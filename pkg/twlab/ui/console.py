"""Plain-TTY helpers: parsing comma lists and printing verdict tables."""

__author__ = "twlab contributors"
__license__ = "GNU GPL 2 or later"

import sys

from ..errors import ValidationError


def parse_choice(in_str, convert=float):
    """Parse one or more values separated by commas and/or spaces.

    @returns: A list of converted values
    @raise ValidationError: naming the first token that does not convert
    """
    choices = []
    for token in in_str.replace(',', ' ').split():
        try:
            choices.append(convert(token))
        except ValueError:
            raise ValidationError("Not a valid value: %s" % token)
    if not choices:
        raise ValidationError("Expected at least one value in %r" % in_str)
    return choices


def parse_range(in_str):
    """Parse C{start:stop:step} (inclusive of C{stop}) or a single value.

    @returns: C{(start, stop, step)}; a single value gives a one-point range
    """
    try:
        parts = [float(x) for x in in_str.split(':')]
    except ValueError:
        raise ValidationError("Not a number or start:stop:step range: %s"
                              % in_str)
    if len(parts) == 1:
        return parts[0], parts[0], 1.0
    elif len(parts) == 3:
        return tuple(parts)
    raise ValidationError("Expected start:stop:step, got %s" % in_str)


def print_table(headers, rows, out=None):
    """Draw a fixed-width table, one row per line."""
    out = out or sys.stdout
    cells = [[str(x) for x in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells])
              for i, h in enumerate(headers)]
    fmt = '  '.join('%%-%ds' % w for w in widths)
    print(fmt % tuple(headers), file=out)
    print(fmt % tuple('-' * w for w in widths), file=out)
    for row in cells:
        print(fmt % tuple(row), file=out)
