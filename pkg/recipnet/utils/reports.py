import csv
import yaml
from .paths import atomic_write


def format_value(value):
    if isinstance(value, float):
        return '{:.6f}'.format(value)
    return '' if value is None else value


def write_csv(path, fieldnames, rows):
    """
    Writes dict rows to a CSV file with '\\n' line endings, formatting floats
    to six decimals
    """
    with atomic_write(path, 'w') as f:
        writer = csv.DictWriter(f, fieldnames=fieldnames,
                                extrasaction='ignore', lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow(dict((k, format_value(v)) for k, v in row.items()))


def write_yaml(path, data):
    with atomic_write(path, 'w') as f:
        yaml.safe_dump(data, f, default_flow_style=False)
