#include <stdio.h>

#include "nilcount/nilcount.h"

int main(void) {
  nc_config* c = NULL;
  nc_count_record r;
  if (nc_config_load("{\"group\":{\"builtin\":\"heisenberg\",\"d\":1}}", &c) != NC_OK) return 1;
  if (nc_count(c, "2", NULL, &r) != NC_OK || r.count != 61) return 1;
  nc_config_free(c);
  printf("nilcount %s: count(2) = %lld\n", nc_version(), (long long)r.count);
  return 0;
}
