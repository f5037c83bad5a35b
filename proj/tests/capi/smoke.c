/* Compiled as C to check that the header is plain C. */
#include <stdio.h>
#include <string.h>

#include "dirlab/dirlab.h"

int main(void) {
  dirlab_pointset* set = NULL;
  size_t count = 0;
  char* json = NULL;
  int rc = 0;

  if (dirlab_generate_garnett(2, &set) != DIRLAB_OK) {
    fprintf(stderr, "generate: %s\n", dirlab_last_error());
    return 1;
  }
  if (dirlab_directions_count(set, 1, &count) != DIRLAB_OK || count == 0) rc = 1;
  if (dirlab_directions_separate(set, 0.05, &json) != DIRLAB_OK || strstr(json, "\"keys\"") == NULL) rc = 1;
  dirlab_string_free(json);
  if (dirlab_pointset_parse("2 1 exact\n", NULL) != DIRLAB_PARSE) rc = 1;
  dirlab_pointset_free(set);
  printf("%s directions=%zu %s\n", dirlab_version(), count, rc ? "FAIL" : "ok");
  return rc;
}
