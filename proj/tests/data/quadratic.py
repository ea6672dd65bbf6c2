#!/usr/bin/env python3
# value = 5 - (x - 1.5)^2 - (k - 2)^2, maximum 5 at k = 2, x = 1.5
import json
import sys

req = json.load(sys.stdin)
k = req["discrete"]["k"]
x = req["continuous"]["x"]
print(json.dumps({"value": 5.0 - (x - 1.5) ** 2 - (k - 2) ** 2}))
