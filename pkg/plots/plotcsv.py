"""Schema-versioned CSV reading shared by the plotting scripts.

The producing toolchain stamps every CSV with a ``# schema=1`` first line;
these scripts refuse anything else so that silent format drift cannot
produce misleading figures.
"""

SCHEMA_LINE = "# schema=1"


class SchemaError(ValueError):
    """Input file does not carry the expected schema or columns."""


def read_table(path):
    """Read a schema-1 CSV into a dict of column-name -> list of floats."""
    with open(path) as fh:
        lines = [line.rstrip("\n") for line in fh]
    if not lines or lines[0].strip() != SCHEMA_LINE:
        found = lines[0].strip() if lines else "<empty file>"
        raise SchemaError(f"{path}: expected first line {SCHEMA_LINE!r}, found {found!r}")
    if len(lines) < 2 or not lines[1].strip():
        raise SchemaError(f"{path}: missing header row")
    header = [name.strip() for name in lines[1].split(",")]
    rows = [line for line in lines[2:] if line.strip()]
    if not rows:
        raise SchemaError(f"{path}: no data rows after the header")
    table = {name: [] for name in header}
    for lineno, line in enumerate(rows, start=3):
        parts = line.split(",")
        if len(parts) != len(header):
            raise SchemaError(f"{path}:{lineno}: expected {len(header)} fields, got {len(parts)}")
        for name, part in zip(header, parts):
            try:
                table[name].append(float(part))
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: not a number: {part!r}") from None
    return table


def require(table, columns, path):
    missing = [name for name in columns if name not in table]
    if missing:
        raise SchemaError(f"{path}: missing required column(s) {missing}")
