#include <stdio.h>
#include <stdlib.h>

static int violations = 0;

static void report_violation(int line) {
    fprintf(stderr, "security assertion violated at line %d\n", line);
    violations++;
}
