void f(unsigned int a, int b) {
 // P(a,b) {a#init<=b, b#init>=0}
 a = a + 1u;
}
int main() { f(1u, 2); }
