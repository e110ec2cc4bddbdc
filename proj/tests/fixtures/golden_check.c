#include <stdio.h>

#include "sefr_golden.h"
#include "sefr_model.h"

static unsigned int predict(const unsigned char *input)
{
    unsigned int c, j, best = 0;
    float best_score = 0.0f;
    for (c = 0; c < SEFR_MODEL_COUNT; ++c) {
        float acc = 0.0f;
        for (j = 0; j < SEFR_FEATURE_COUNT; ++j)
            acc += sefr_weights[c][j] * ((float)input[j] / 255.0f);
        acc += sefr_biases[c];
        if (SEFR_BINARY)
            return acc > 0.0f ? 1u : 0u;
        if (c == 0 || acc < best_score) {
            best = c;
            best_score = acc;
        }
    }
    return best;
}

int main(void)
{
    unsigned int i, mismatches = 0;
    for (i = 0; i < SEFR_GOLDEN_COUNT; ++i)
        if (predict(sefr_golden_inputs[i]) != sefr_golden_expected[i])
            ++mismatches;
    printf("%u golden records, %u mismatches, classes: %s..%s\n", (unsigned)SEFR_GOLDEN_COUNT, mismatches,
           sefr_classes[0], sefr_classes[SEFR_CLASS_COUNT - 1]);
    return mismatches == 0 ? 0 : 1;
}
