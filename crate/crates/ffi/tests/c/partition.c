#include <stdio.h>
#include <string.h>

#include "abelian_bf.h"

static int expect(const char *what, BfStatus status) {
  if (status != BF_STATUS_OK) {
    fprintf(stderr, "%s failed (%d): %s\n", what, (int)status, bf_last_error_message());
    return 1;
  }
  return 0;
}

int main(void) {
  BfManifold *m = NULL;
  BfGroup *h1 = NULL;
  char *value = NULL;
  if (expect("lookup", bf_manifold_lookup("L2_1#L3_1", &m))) return 1;
  if (expect("h1", bf_manifold_h1(m, &h1))) return 1;
  if (expect("partition", bf_partition(h1, 6, BF_CONVENTION_TORSION_ONLY, &value))) return 1;
  printf("%s\n", value);
  int ok = strcmp(value, "36") == 0;
  bf_string_free(value);

  if (bf_manifold_lookup("nowhere", &m) != BF_STATUS_NOT_FOUND) return 1;
  printf("%s\n", bf_last_error_message());

  bf_group_free(h1);
  bf_manifold_free(m);
  return ok ? 0 : 1;
}
