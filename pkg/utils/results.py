import json
from os import makedirs
from os.path import join as joinpath

CSV_FLOAT_FORMAT = "%.17g"


def save_csv(frame, results_dir, filename):
    makedirs(results_dir, exist_ok=True)
    path = joinpath(results_dir, filename)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    return path


def save_json(results, results_dir, filename):
    makedirs(results_dir, exist_ok=True)
    path = joinpath(results_dir, filename)
    with open(path, "w", encoding="utf-8") as file:
        json.dump(results, file, ensure_ascii=False, indent=4)
    return path


def load_json(path):
    with open(path, "r", encoding="utf-8") as file:
        return json.load(file)


def print_table(title, table, format="markdown"):
    print(title)
    if format == "latex":
        print(table.to_latex(index=False))
    elif format == "markdown":
        print(table.to_markdown(index=False))
    elif format == "default":
        print(table)
    else:
        raise ValueError("Unknown format")
