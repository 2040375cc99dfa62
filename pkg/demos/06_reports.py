# %% [markdown]
# # Full reports
#
# `run_report` chains every stage for one model; `run_corpus` runs a list.
# The same runs are available from the shell:
#
#     lgfano report 3@3 --format markdown
#     lgfano corpus --workers 4

# %%
import json

from lgfano.report import RunConfig, render, render_corpus, run_corpus, run_report

rep = run_report(RunConfig("3@3", trials=50))
print(render(rep, "markdown"))
print(json.dumps(rep.verdicts, indent=1))

# %%
res = run_corpus(["@1", "2@3", "3@3", "5@4"], RunConfig(trials=30, period_order=8))
print(render_corpus(res, "markdown"))
print("exit status:", res.exit_status)
