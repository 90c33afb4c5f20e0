# %% [markdown]
# Reports, family files and the command line
#
# Every check returns a Report that serializes to deterministic JSON. Families
# round-trip through a small JSON file format, and the same checks are
# available from the `qekr` command.

# %%
import tempfile
from pathlib import Path

from qekr import cli
from qekr.families import check_bounds, load_family, random_intersecting, save_family
from qekr.grassmann import grassmannian

F = random_intersecting(grassmannian(5, 2, 3), seed=4, target=50)
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "family.json"
    save_family(F, path)
    print(path.read_text()[:300])
    assert load_family(path) == F

# %%
print(check_bounds(F, 1).to_json())

# %%
code = cli.main(["family", "--pencil", "--n", "7", "--k", "3", "--q", "2", "--d", "2"])
print("exit code", code)
