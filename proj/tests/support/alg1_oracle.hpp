// SPDX-License-Identifier: Apache-2.0
// Stand-alone model of multi-path sampling for one node, used to check the
// orchestrator's call counts, stop points and path choice.
#pragma once

#include <vector>

namespace oracle
{

struct Alg1Path
{
    int coder_calls = 0;
    int evaluator_calls = 0;
    int best = 0;
    int best_iteration = -1;
};

struct Alg1Result
{
    std::vector<Alg1Path> paths;
    int selected = 0;  // 1-based, 0 when every path stayed at score 0
};

// scores[m][t] is what the evaluator would return on iteration t of path m.
inline Alg1Result simulate_alg1(const std::vector<std::vector<int>>& scores, int T, double s_tau)
{
    Alg1Result r;
    for (const auto& row: scores)
    {
        Alg1Path p;
        p.coder_calls = 1;
        for (int t = 0; t < T; ++t)
        {
            ++p.evaluator_calls;
            if (row[t] > p.best)
                p.best = row[t], p.best_iteration = t;
            if (row[t] >= s_tau || t == T - 1)
                break;
            ++p.coder_calls;
        }
        r.paths.push_back(p);
    }
    int best = 0;
    for (int m = 0; m < static_cast<int>(r.paths.size()); ++m)
        if (r.paths[m].best > best)
            best = r.paths[m].best, r.selected = m + 1;
    return r;
}

} // namespace oracle
