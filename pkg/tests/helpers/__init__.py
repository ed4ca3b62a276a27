# Oracles, hypothesis strategies and failure bundles shared by the test modules.
