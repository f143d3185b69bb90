"""Regenerate the bundled sample CSVs under src/boostcraft/data/.

Sources are public datasets shipped with scikit-learn:
  * digits8_60 / digits8_40: optical handwritten digits, digit 8 vs the rest
    with the minority subsampled to 60 (1:27) and 40 (1:41) instances, the
    standard construction for high-imbalance benchmarks.
  * diabetes44: the diabetes progression study binarized at the 44 largest
    one-year progression scores (1:9.05); noisy features make this a hard
    task for stumps.
  * wdbc40: Wisconsin diagnostic breast cancer with the malignant class
    subsampled to 40 instances (1:8.9); an easy, fast demo set.

Deterministic: re-running reproduces the committed files byte for byte.
"""
from pathlib import Path

import numpy as np
from sklearn.datasets import load_breast_cancer, load_diabetes, load_digits

OUT = Path(__file__).resolve().parent.parent / "src" / "boostcraft" / "data"


def write_csv(path, names, features, labels):
    lines = [",".join(list(names) + ["target"])]
    for row, label in zip(features, labels):
        cells = [repr(float(v)) for v in row]
        lines.append(",".join(cells + ["pos" if label == 1 else "neg"]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    n_pos = int(np.sum(labels == 1))
    print(f"{path.name}: {n_pos} pos / {len(labels) - n_pos} neg "
          f"(1:{(len(labels) - n_pos) / n_pos:.2f})")


def digits_subsampled(digit, minority_size, seed):
    data = load_digits()
    pos = np.flatnonzero(data.target == digit)
    neg = np.flatnonzero(data.target != digit)
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(pos, size=minority_size, replace=False))
    idx = np.concatenate([keep, neg])
    labels = np.where(data.target[idx] == digit, 1, -1)
    names = [f"px{j}" for j in range(data.data.shape[1])]
    return names, data.data[idx], labels


def diabetes_top(k):
    data = load_diabetes()
    order = np.argsort(-data.target, kind="stable")
    thresh = data.target[order[k - 1]]
    labels = np.where(data.target >= thresh, 1, -1)
    return list(data.feature_names), data.data, labels


def wdbc_subsampled(minority_size, seed):
    data = load_breast_cancer()
    # target 0 = malignant (212 instances); keep a seeded subset as minority
    rng = np.random.default_rng(seed)
    malignant = np.flatnonzero(data.target == 0)
    benign = np.flatnonzero(data.target == 1)
    keep = np.sort(rng.choice(malignant, size=minority_size, replace=False))
    idx = np.concatenate([keep, benign])
    labels = np.where(data.target[idx] == 0, 1, -1)
    names = [name.replace(" ", "_") for name in data.feature_names]
    return names, data.data[idx], labels


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for size in (60, 40):
        names, features, labels = digits_subsampled(8, size, seed=7)
        write_csv(OUT / f"digits8_{size}.csv", names, features, labels)
    names, features, labels = diabetes_top(44)
    write_csv(OUT / "diabetes44.csv", names, features, labels)
    names, features, labels = wdbc_subsampled(40, seed=7)
    write_csv(OUT / "wdbc40.csv", names, features, labels)


if __name__ == "__main__":
    main()
