int main() { int i = 0; int j = 0;
 while (i < 5) {
 // P(i,j) {0<=i, i<=5, i==j}
 i++; j++; } }
