#include <stdlib.h>
#include <string.h>

#define CSV_STRICT 1
#define CSV_SPACES 2
#define CSV_DEFAULT_BLK 128
#define CSV_GROW(n) ((n) * 2)
#define UNUSED_FLAG 64

typedef unsigned char byte_t;

struct csv_field {
  char *buf;
  size_t len;
};

typedef struct csv_parser {
  int pstate;
  int quoted;
  size_t spaces;
  size_t blk_size;
  struct csv_field field;
  byte_t delim;
  byte_t quote;
} csv_parser;

struct unrelated { int a; int b; };

/* Sets the block size used when the field buffer grows. */
void csv_set_blk_size(csv_parser *p, size_t size) {
  if (p == NULL) return;
  p->blk_size = size;
}

int csv_grow(csv_parser *p) {
  size_t to_add = p->blk_size ? p->blk_size : CSV_DEFAULT_BLK;
  char *vp = realloc(p->field.buf, CSV_GROW(p->field.len) + to_add);
  if (vp == NULL) { return -1; }
  p->field.buf = vp;
  return 0;
}

byte_t csv_get_delim(const csv_parser *p) {
  return p->delim;
}
