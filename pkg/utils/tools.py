import hashlib
import json
import os
import sys

import numpy as np
import pandas as pd
import matplotlib.pyplot as plt

plt.switch_backend('agg')


class Logger(object):
    """Tee stdout into a log file."""

    def __init__(self, fileN="run_log.txt"):
        self.terminal = sys.stdout
        self.log = open(fileN, "a")

    def write(self, message):
        self.terminal.write(message)
        self.log.write(message)

    def flush(self):
        self.terminal.flush()
        self.log.flush()


def case_seed(master_seed, *labels):
    """Per-case seed: first 8 bytes of sha256(master seed, case labels)."""
    key = '|'.join([str(int(master_seed))] + [str(label) for label in labels])
    digest = hashlib.sha256(key.encode('utf-8')).digest()
    # numpy Generators accept up to 2**128, keep it well inside uint64
    return int.from_bytes(digest[:8], 'big')


def params_hash(payload):
    blob = json.dumps(payload, sort_keys=True, default=float).encode('utf-8')
    return hashlib.sha256(blob).hexdigest()


def file_checksum(path):
    sha = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(1 << 20), b''):
            sha.update(chunk)
    return sha.hexdigest()


def write_table(path, columns):
    """Write an ordered mapping of equal-length columns as a byte-stable CSV."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    df = pd.DataFrame({k: np.asarray(v) for k, v in columns.items()})
    df.to_csv(path, index=False, float_format='%.17g')
    return path


def write_json(path, payload):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w') as f:
        json.dump(payload, f, sort_keys=True, indent=2, default=_to_builtin)
    return path


def read_json(path):
    with open(path, 'r') as f:
        return json.load(f)


def _to_builtin(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'not JSON serializable: {type(value)}')


def visual(csv_path, x=None, name=None):
    """
    Quick-look rendering of a plot-data CSV (first column against the rest)
    """
    df = pd.read_csv(csv_path)
    x = x or df.columns[0]
    name = name or os.path.splitext(csv_path)[0] + '.png'
    plt.figure()
    for col in df.columns:
        if col == x or df[col].dtype == object:
            continue
        plt.plot(df[x], df[col], label=col, linewidth=1)
    plt.xlabel(x)
    plt.legend(fontsize='small')
    plt.savefig(name, bbox_inches='tight')
    plt.close()
    return name
