"""Portfolio reactive-synthesis toolkit.

Submodules:
  ltl       - LTL syntax, parsing, lasso-trace semantics
  aiger     - ASCII AIGER circuits: parse, serialize, simulate
  buchi     - LTL to Buchi automata via the tableau construction
  mc        - model checking of circuits against specifications
  synth     - bounded synthesis of Mealy machines
  wire      - JSON message schemas for solver services
  services  - HTTP services and clients
  portfolio - parallel solver orchestration with a soundness gate
  datagen   - training-data mining, assembly, and filtering
  cli       - command-line entry points
"""

__version__ = "0.1.0"
