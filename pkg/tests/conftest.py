import gmpy2

# Library code always runs inside explicit precision contexts; this default
# only protects arithmetic done *in the tests* on returned values from being
# silently demoted to 53 bits.
gmpy2.set_context(gmpy2.context(precision=320))
