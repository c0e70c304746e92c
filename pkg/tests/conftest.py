from hypothesis import settings

# reproducible property runs: fixed example budget, no wall-clock deadline
settings.register_profile("repo", deadline=None, derandomize=True, max_examples=50)
settings.load_profile("repo")
