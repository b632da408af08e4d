"""Generate the bundled demo dataset and look at what makes it interesting.

The generator produces a small clinical-style table with two protected
attributes (Race, Sex), two numeric measurements, a care setting, and a binary
diagnosis label. One group is given an elevated positive rate on purpose so
the fairness tooling downstream has something to find.
"""

from pathlib import Path

from fairsynth import DemoSpec, demo_metadata, make_demo_dataset, write_csv

out_dir = Path(__file__).parent / "out"
out_dir.mkdir(exist_ok=True)

# disparity_strength is the extra positive-label probability for the elevated
# group; 0.0 would make every group sit at the base rate of 0.25
spec = DemoSpec(n_rows=2000, seed=0, disparity_strength=0.3)
data = make_demo_dataset(spec)
metadata = demo_metadata()

print(f"rows: {data.row_count}")
print("columns:", ", ".join(f"{name} ({kind.value})" for name, kind in data.schema.columns))
print(f"label: {metadata.label_column} (positive = {metadata.positive_label!r})")
print(f"protected attributes: {', '.join(metadata.protected_attributes)}")

# Positive rates per racial group show the built-in disparity.
race = data.decoded("Race")
label = data.decoded("Diagnosis")
print("\npositive rate by group:")
for group in sorted(set(race.tolist())):
    mask = race == group
    rate = float((label[mask] == "positive").mean())
    print(f"  {group:<10} {rate:.3f}  (n = {int(mask.sum())})")

# The numeric columns carry signal: symptom_scale is shifted up for positive
# cases, functioning_score is shifted down.
symptom = data.column("symptom_scale").values
positive = label == "positive"
print(f"\nsymptom_scale mean: positive {symptom[positive].mean():+.2f}, "
      f"negative {symptom[~positive].mean():+.2f}")

func = data.column("functioning_score").values
print(f"functioning_score mean: positive {func[positive].mean():.1f}, "
      f"negative {func[~positive].mean():.1f}")

# Same spec, same bytes: generation is fully seeded.
again = make_demo_dataset(spec)
print(f"\nregenerated with the same spec, identical: {again == data}")

csv_path = out_dir / "demo.csv"
write_csv(data, csv_path)
print(f"wrote {csv_path} ({csv_path.stat().st_size} bytes)")
