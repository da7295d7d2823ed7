# Machine-readable certificates: run verification scenarios programmatically
# and read the structured report back.
# Run with: python demos/05_certificates.py

from triform.verifier import ScenarioConfig, parse_report, run_scenario

# The depth-one configuration: the third representation is Steinberg.
report = run_scenario(ScenarioConfig(p=2, n=1, scenario="main-theorem", seed=1))
print(report.emit("text"))
print()

# The structured format is byte-deterministic for a fixed config and seed.
blob = report.emit("structured")
again = run_scenario(ScenarioConfig(p=2, n=1, scenario="main-theorem", seed=1)).emit("structured")
print("byte-deterministic:", blob == again)
parsed = parse_report(blob)
print("round trip:", [c.verdict for c in parsed.checks])

# Configuration errors are loud and early: there is no conductor-2 family at p = 2.
from triform.verifier import ConfigError, Env

try:
    Env(ScenarioConfig(p=2, n=2))
except ConfigError as e:
    print("expected refusal:", e)
